#include <pybind11/pybind11.h>

namespace py = pybind11;

PYBIND11_MODULE(_igcn, m) {
  m.doc() = "Integrative graph convolutional networks for multi-modal node classification";
}
