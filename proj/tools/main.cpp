#include "ecto/cli/app.hpp"

int main(int argc, char** argv) { return ecto::cli::main(argc, argv); }
