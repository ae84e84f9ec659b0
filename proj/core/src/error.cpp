#include "truncld/error.hpp"

namespace truncld {

void throw_invalid(const std::string& what) { throw InvalidArgument(what); }

void throw_assumption(const std::string& what) { throw AssumptionViolation(what); }

}  // namespace truncld
