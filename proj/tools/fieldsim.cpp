#include <csignal>
#include <iostream>

#include "fieldsim/cli/cli.hpp"

namespace {

extern "C" void on_sigint(int) { fieldsim::cli::request_interrupt(); }

}  // namespace

int main(int argc, char** argv)
{
    std::signal(SIGINT, on_sigint);
    return fieldsim::cli::run_cli(argc, argv, std::cout, std::cerr);
}
