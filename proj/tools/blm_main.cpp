#include <string>
#include <vector>

#include "blm/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return blm::cli::run(args);
}
