#include "survmix/cli.hpp"

int main(int argc, char** argv) { return survmix::cli_main(argc, argv); }
