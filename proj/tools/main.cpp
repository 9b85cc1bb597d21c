#include "cli.hpp"

int main(int argc, char** argv) { return ivp::cli::main(argc, argv); }
