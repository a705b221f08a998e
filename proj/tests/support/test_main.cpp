#define DOCTEST_CONFIG_IMPLEMENT
#include <doctest.h>

#include "pinnreg/runtime.hpp"

int main(int argc, char** argv) {
  pinnreg::tune_allocator();
  doctest::Context context(argc, argv);
  return context.run();
}
