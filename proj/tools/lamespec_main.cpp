#include "lame/cli.hpp"

int main(int argc, char** argv) { return lame::cli::dispatch(argc, argv); }
