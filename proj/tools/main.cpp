#include "cli/commands.hpp"

int main(int argc, char** argv) {
    return synthrf::cli::run(argc, argv);
}
