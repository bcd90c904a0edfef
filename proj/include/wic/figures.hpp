#pragma once

#include <string>
#include <vector>

#include "wic/diffnum.hpp"
#include "wic/gridworld.hpp"
#include "wic/metrics.hpp"

namespace wic {

// "skill,row,col,value" rows for every free cell; walls omitted.
std::string heatmap_csv(const std::vector<Matrix>& maps);
// "skill,row,col,distance" rows.
std::string endpoints_csv(const std::vector<EndpointRow>& rows);

// One panel per skill, diverging colour scale shared across panels.
std::string heatmap_svg(const GridSpec& spec, const std::vector<Matrix>& maps,
                        const std::string& title);

// Endpoints as dots coloured by skill, jittered within their cell.
std::string endpoints_svg(const GridSpec& spec, const std::vector<EndpointRow>& rows,
                          int skill_count, const std::string& title);

struct Curve {
  std::string label;
  std::vector<double> x;
  std::vector<double> mean;
  std::vector<double> stddev;  // empty for a single run
};

// Line plot; each curve gets a shaded mean +/- stddev band when stddev is set.
std::string curves_svg(const std::vector<Curve>& curves, const std::string& title,
                       const std::string& y_label);

}  // namespace wic
