#include "surfpde/cli.hpp"

int main(int argc, char** argv) { return surfpde::run(argc, argv); }
