#include <iostream>
#include <string>
#include <vector>

#include "faqir/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return faqir::cli::dispatch(args, std::cout, std::cerr);
}
