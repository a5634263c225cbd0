#include "pgnbsc/pipeline.hpp"

int main(int argc, char** argv) { return pgnbsc::pipeline::cli_main(argc, argv); }
