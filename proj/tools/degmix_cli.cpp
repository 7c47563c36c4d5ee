#include "degmix/experiment.hpp"

int main(int argc, char** argv) { return degmix::cli_main(argc, argv); }
