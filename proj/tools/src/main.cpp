#include "app.hpp"

int main(int argc, char** argv) { return truncld::app::main_entry(argc, argv); }
