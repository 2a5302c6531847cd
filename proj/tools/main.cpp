#include "uncross/cli.hpp"

int main(int argc, char** argv) { return uncross::run_cli(argc, argv); }
