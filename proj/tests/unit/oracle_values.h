#pragma once

// Reference values from tests/oracles/*.py.  Regenerate with
//   python3 exact_likelihood.py; python3 numeric.py

#include <array>

namespace oracle {

// theta = 1/2, M = [[0.3, 0.7], [0.6, 0.4]], stationary (6/13, 7/13).
struct Sample_probability {
  const char* measure;
  int c0;
  int c1;
  double value;
};

inline constexpr Sample_probability k_sample_probabilities[] = {
  {"kingman", 1, 0, 0.46153846153846156},
  {"kingman", 0, 1, 0.5384615384615384},
  {"kingman", 2, 0, 0.3210702341137124},
  {"kingman", 1, 1, 0.2809364548494983},
  {"kingman", 0, 2, 0.3979933110367893},
  {"kingman", 3, 0, 0.25296442687747034},
  {"kingman", 2, 1, 0.20431742170872605},
  {"kingman", 1, 2, 0.21708726056552144},
  {"kingman", 0, 3, 0.3256308908482822},
  {"kingman", 4, 0, 0.21178417133927752},
  {"kingman", 3, 1, 0.1647210221527714},
  {"kingman", 2, 2, 0.16155331018829502},
  {"kingman", 1, 3, 0.1817474739618319},
  {"kingman", 0, 4, 0.2801940223578242},
  {"star", 1, 0, 0.46153846153846156},
  {"star", 0, 1, 0.5384615384615384},
  {"star", 2, 0, 0.3210702341137124},
  {"star", 1, 1, 0.2809364548494983},
  {"star", 0, 2, 0.3979933110367893},
  {"star", 3, 0, 0.254407346522306},
  {"star", 2, 1, 0.19998866277421914},
  {"star", 1, 2, 0.22141601950002834},
  {"star", 0, 3, 0.3241879712034465},
  {"star", 4, 0, 0.21300757704589687},
  {"star", 3, 1, 0.1655990779056365},
  {"star", 2, 2, 0.15157870868998355},
  {"star", 1, 3, 0.19416888687338207},
  {"star", 0, 4, 0.275645749485101},
  {"uniform", 1, 0, 0.46153846153846156},
  {"uniform", 0, 1, 0.5384615384615384},
  {"uniform", 2, 0, 0.3210702341137124},
  {"uniform", 1, 1, 0.2809364548494983},
  {"uniform", 0, 2, 0.3979933110367893},
  {"uniform", 3, 0, 0.2535032386435799},
  {"uniform", 2, 1, 0.20270098641039752},
  {"uniform", 1, 2, 0.21870369586384997},
  {"uniform", 0, 3, 0.32509207908217264},
  {"uniform", 4, 0, 0.21055416790144363},
  {"uniform", 3, 1, 0.17179628296854493},
  {"uniform", 2, 2, 0.14770754836797764},
  {"uniform", 1, 3, 0.19313322890648152},
  {"uniform", 0, 4, 0.27680877185555225},
};

struct Table1_row {
  double theta;
  double e_kingman;
  double e_star;
};

inline constexpr Table1_row k_table1[] = {
  {0.04, 0.84062919075142486, 0.15937080924857514},
  {0.1, 0.73498132726443049, 0.26501867273556951},
  {0.5, 0.53774687751666943, 0.46225312248333057},
  {1, 0.5, 0.5},
  {5, 0.65491179207383369, 0.34508820792616631},
  {10, 0.75034170722277335, 0.24965829277722665},
  {17, 0.81509582986437509, 0.18490417013562491},
};

// Moments lambda_k, k = 3, 4, 7, 12, 25, 40, of a normal kernel on [1e-6, 1].
struct Kernel_moments {
  double location;
  double sigma;
  std::array<double, 6> values;
};

inline constexpr std::array<int, 6> k_kernel_moment_orders = {3, 4, 7, 12, 25, 40};

inline constexpr Kernel_moments k_kernel_moments[] = {
  {0.3, 0.1, {0.30044379723668837, 0.10013313961388904, 0.0055875445729740907, 0.00011136873969621231, 8.7674401320263987e-8, 6.1778936648238442e-10}},
  {0.88, 0.24, {0.757946507657446, 0.60237270504429673, 0.35938526152338608, 0.20595799627607838, 0.093630840467345542, 0.056741879892301899}},
  {0.05, 0.5, {0.37413423589642636, 0.20451763728635505, 0.07370677124767121, 0.03231006945175924, 0.012499539237654909, 0.0072515417723452757}},
  {0.6, 0.01, {0.6, 0.3601, 0.07797609, 0.0061224946612101094, 8.4687534623781291e-6, 4.5051556055169186e-9}},
};

inline constexpr std::array<double, 5> k_gauss_uniform_nodes = {0.046910077030668004, 0.23076534494715845, 0.5, 0.76923465505284155, 0.953089922969332};

inline constexpr std::array<double, 5> k_gauss_uniform_weights = {0.11846344252809454, 0.23931433524968323, 0.28444444444444444, 0.23931433524968323, 0.11846344252809454};

inline constexpr std::array<double, 5> k_gauss_beta_nodes = {0.020253513192751305, 0.17256963302735747, 0.42884258086335743, 0.70770750650094321, 0.92062676641559058};

inline constexpr std::array<double, 5> k_gauss_beta_weights = {0.35627144974809043, 0.30088376980823365, 0.20769360695877912, 0.10628817945420247, 0.028862994030694333};

// min and max of E[exp(-r)] subject to lambda_3 <= 0.5, lambda_4 >= 0.3:
// LP over a 20001-point grid, then SLSQP refinement.
inline constexpr double k_exp_bound_min = 0.6199132785582734;
inline constexpr double k_exp_bound_max = 0.8103638323514326;

}  // namespace oracle
