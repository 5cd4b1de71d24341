#include "mppstat/cli.hpp"

int main(int argc, char** argv) { return mppstat::cli::run(argc, argv); }
