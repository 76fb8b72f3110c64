#include "ccts/report/cli.hpp"

int main(int argc, char** argv) { return ccts::report::cli_main(argc, argv); }
