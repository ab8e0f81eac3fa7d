#include "hcont_app.hpp"

int main(int argc, char** argv) { return hcont::cli::main_entry(argc, argv); }
