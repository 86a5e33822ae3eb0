#include "crawl/cli.hpp"

int main(int argc, char** argv) { return crawl::cli::main(argc, argv); }
