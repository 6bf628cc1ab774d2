#include "rscorrect/tools/cli.hpp"

int main(int argc, char** argv) { return rscorrect::tools::run_cli(argc, argv); }
