// io.hpp - CSV and JSON export of states, trajectories and phase diagrams

#pragma once

#include <array>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "dimer/dynamics.hpp"
#include "dimer/model.hpp"
#include "dimer/phasemap.hpp"
#include "dimer/stability.hpp"

namespace dimer::io {

using nlohmann::json;

/// %.17g; enough digits to round-trip any double.
std::string fmt(double v);

/// Header: t,re_g1,im_g1,x1,y1,z1,re_g2,im_g2,x2,y2,z2,J,norm_err1,norm_err2[,energy]
void write_trajectory_csv(std::ostream& out, const Trajectory& traj);

json to_json(const CavityParams& c);
json to_json(const DimerParams& p);
json to_json(const DimerState& s);
json to_json(const ComplexVector& v);
json to_json(const StabilityReport& r);
json to_json(const Trajectory& t);  // summary only, no samples
json to_json(const QuenchResult& q);
json to_json(const RampResult& r);
json to_json(const PhaseLabel& l);
json to_json(const Axis& a);
json to_json(const PhaseDiagram& d);

/// One row per cell: axis values followed by the label.
void write_phase_diagram_csv(std::ostream& out, const PhaseDiagram& d);

struct Polyline {
    std::string name;
    std::vector<std::array<double, 2>> points;
};

/// Header: curve,<x_name>,<y_name>; one row per vertex.
void write_polylines_csv(std::ostream& out, const std::string& x_name, const std::string& y_name,
                         const std::vector<Polyline>& curves);

}  // namespace dimer::io
