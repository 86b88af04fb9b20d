#define DOCTEST_CONFIG_IMPLEMENT
#include "torch_doctest.hpp"

#include <torch/torch.h>

int main(int argc, char** argv) {
  at::set_num_threads(1);
  torch::manual_seed(0);
  doctest::Context ctx(argc, argv);
  return ctx.run();
}
