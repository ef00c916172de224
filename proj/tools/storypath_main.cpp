#include "storypath/cli.hpp"

int main(int argc, char** argv) { return storypath::cli::run(argc, argv); }
