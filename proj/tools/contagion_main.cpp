#include "contagion/cli.hpp"

int main(int argc, char** argv) { return contagion::cli::dispatch(argc, argv); }
