#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>

#include "topomask/mask.hpp"
#include "topomask/tensor.hpp"

namespace topomask {

// A parsed mask descriptor, bound to a uniform matrix-free interface. For
// variants backed by a MaskOperator the operator is exposed directly; tree
// and diffusion masks only provide the closures.
struct MaskHandle {
    std::string variant;
    std::size_t dim = 0;
    std::shared_ptr<const MaskOperator> op;  // null for tree/gdk masks
    std::function<Vector(std::span<const double>)> apply;
    std::function<DenseMatrix(std::size_t cap)> materialize;

    DenseMatrix apply_matrix(const DenseMatrix& x) const;
};

// One-line grammar: `<variant> key=value ...`. Variants:
//   causal L=
//   packing segments=a:b,b:c,...
//   padding L= valid=
//   toeplitz xi=<file>
//   blocktoeplitz dims=n1xn2x... f=<file>
//   tree-expaffine tree=<file> a= b=
//   tree-general tree=<file> f=<file> [algo=auto|diam|sep]
//   gdk graph=<file> lambda= variant= tol=
//   hypercube d= lambda=
//   rwgnk graph=<file> lambda= alpha= tau=|p= walks= seed=
//   dense m=<file>
// Unknown or duplicate keys are rejected; file paths resolve against the
// working directory.
MaskHandle parse_mask_descriptor(const std::string& line);

// The grammar text above, for --help output.
const char* mask_descriptor_grammar();

}  // namespace topomask
