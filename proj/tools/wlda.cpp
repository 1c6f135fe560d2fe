#include "wlda/cli.hpp"

int main(int argc, char** argv) { return wlda::cli::run(argc, argv); }
