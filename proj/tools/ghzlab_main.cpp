#include "ghzlab/cli.hpp"

int main(int argc, char** argv) {
    return ghzlab::cli::run(argc, argv);
}
