#include "cli.hpp"

int main(int argc, char** argv)
{
    return fbma::cli::main(argc, argv);
}
