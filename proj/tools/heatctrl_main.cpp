#include "heatctrl/cli.hpp"

int main(int argc, char** argv) {
    return heatctrl::cli::run(argc, argv);
}
