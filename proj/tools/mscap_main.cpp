#include "mscap/experiment.hpp"

int main(int argc, char** argv) { return mscap::cli_main(argc, argv); }
