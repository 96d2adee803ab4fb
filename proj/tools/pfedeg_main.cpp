#include <vector>

#include "pfedeg/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return pfedeg::cli_main(args);
}
