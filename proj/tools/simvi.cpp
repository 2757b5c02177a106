#include "simvi/cli.hpp"

int main(int argc, char** argv) { return simvi::parse_and_dispatch(argc, argv); }
