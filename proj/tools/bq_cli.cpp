#include "bq/cli.hpp"

int main(int argc, char** argv) { return bq::cli::main_entry(argc, argv); }
