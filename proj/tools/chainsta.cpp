// SPDX-License-Identifier: Apache-2.0
#include <chainsta/cli/app.hpp>

int main(int argc, char** argv) { return chainsta::cli::run_cli(argc, argv); }
