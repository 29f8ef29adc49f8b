#include "nephrodose/cli.hpp"

int main(int argc, char** argv) { return nephrodose::run_cli(argc, argv); }
