#include "mrplab/cli.hpp"

int main(int argc, char** argv) { return mrplab::cli::dispatch(argc, argv); }
