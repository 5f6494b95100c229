#include "rpl/commands.hpp"

int main(int argc, char** argv) { return rpl::run_command(argc, argv); }
