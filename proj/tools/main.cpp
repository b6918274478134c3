#include "matchfn/cli.hpp"

int main(int argc, char** argv) { return matchfn::run_cli(argc, argv); }
