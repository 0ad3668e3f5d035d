#include "qwsq/app.hpp"

int main(int argc, char** argv) { return qwsq::cli::main_entry(argc, argv); }
