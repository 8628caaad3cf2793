#include "cli.hpp"

int main(int argc, char** argv) { return igl::cli::run(argc, argv); }
