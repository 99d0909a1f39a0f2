#pragma once

#include "oldb/lorentz.hpp"
#include "oldb/semigroup.hpp"

namespace oldb {

using Gridd = Grid<double>;
using Fieldd = Field<double>;
using Spectrumd = Spectrum<double>;
using VectorFieldd = VectorField<double>;
using TensorFieldd = TensorField<double>;
using VectorSpectrumd = VectorSpectrum<double>;
using Partitiond = DyadicPartition<double>;
using BesovParamsd = BesovParams<double>;
using ArrayXd = ArrayX<double>;

}  // namespace oldb
