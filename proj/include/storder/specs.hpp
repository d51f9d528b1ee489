#pragma once

#include <string_view>

#include "storder/copulas.hpp"
#include "storder/distortions.hpp"
#include "storder/distributions.hpp"

namespace storder {

/// Textual forms used by the command line, configuration files and the
/// Python bindings.
///
///   distributions   exp:<rate> | q:<expr in p> | hazard:<expr in x>
///                   | distort(<distribution>, h=<distortion>)
///   distortions     identity | power:<k> | dualpower:<k> | h:<expr in p> | <expr in p>
///   copulas         durante:f=<expr>,n=<int> | diagonal:d=<expr>,n=<int>
///                   | product:<n> | comonotone:<n>
///                   | cuadras-auge:theta=<v> | frechet:gamma=<v>
///
/// Malformed text raises std::invalid_argument or ParseError; validation
/// failures raise ValidationError.
DistributionSpec parse_distribution_spec(std::string_view text);
Distribution parse_distribution(std::string_view text, const Grid& grid = Grid::uniform());
Distortion parse_distortion(std::string_view text, const Grid& grid = Grid::uniform());
CopulaHandle parse_copula(std::string_view text, const Grid& grid = Grid::uniform());

}  // namespace storder
