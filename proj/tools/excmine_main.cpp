#include "excmine/cli.hpp"

int main(int argc, char** argv) { return excmine::cli::run(argc, argv); }
