#include "reachlab/cli.hpp"

int main(int argc, char** argv) { return reachlab::run(argc, argv); }
