#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include <unistd.h>

#include "app.hpp"

int main(int argc, char** argv) {
    const char* no_color = std::getenv("NO_COLOR");
    vqvi::cli::Terminal term;
    term.color = isatty(STDOUT_FILENO) != 0 && (no_color == nullptr || *no_color == '\0');
    const std::vector<std::string> args(argv + 1, argv + argc);
    return vqvi::cli::run(args, std::cout, std::cerr, term);
}
