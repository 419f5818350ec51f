#include <string>
#include <vector>

#include "segsim/cli.hpp"

int main(int argc, char** argv) {
    return segsim::cli::run_cli(std::vector<std::string>(argv + 1, argv + argc));
}
