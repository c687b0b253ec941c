// SPDX-License-Identifier: Apache-2.0
//
#include "platewave/quadrature.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace platewave {

namespace {

using Node = AlpertLogRule::Node;

// tools/gen_alpert_log_rules.py
constexpr Node rule4[] = {
    {0.023390130272038000359, 0.086097365561581047869},
    {0.28547649313119837478, 0.48470196854179593757},
    {1.0054033272206997334, 0.91529888691237249675},
    {1.9949703039942943023, 1.0139017789842505178},
};
constexpr Node rule6[] = {
    {0.012063742973918910639, 0.045259097632273795576},
    {0.16342096425496828785, 0.3001272703047386115},
    {0.68187566855001761953, 0.75418263165132654451},
    {1.6528559717432905199, 1.1498249599186966201},
    {2.8643278853336796818, 1.207787285413585085},
    {3.988696590132258539, 1.0428187550793793433},
};
constexpr Node rule8[] = {
    {0.0064623700335774916079, 0.024436549398505873879},
    {0.091486844104990854494, 0.17343022012035553939},
    {0.41141677000083672214, 0.4924865645700322952},
    {1.110729435930792265, 0.91105397517897134733},
    {2.2126904697441807393, 1.2665880246179083423},
    {3.5637321656794514699, 1.3852494538761429632},
    {4.8840335312474537303, 1.2187594949568063091},
    {5.9932833389098531028, 1.0279957172812773297},
};
constexpr Node rule10[] = {
    {0.003790207233444021376, 0.014388202975040494082},
    {0.05484497461262593445, 0.10557572947967143864},
    {0.25592023017153346125, 0.31779751704959491039},
    {0.72843212783019490803, 0.64205608006709138663},
    {1.5562638063280199459, 1.0136883347175248157},
    {2.7375235868889089611, 1.3302810689851805022},
    {4.1624000455512904546, 1.4848246601172458706},
    {5.6295540862586322477, 1.4101652377337300662},
    {6.9230242916625484922, 1.1664864255634499742},
    {7.9967258748896055112, 1.0147367433114705414},
};
constexpr Node rule12[] = {
    {0.0023951780126059377802, 0.0091125897106828750685},
    {0.03509167754297205066, 0.068133112310925461008},
    {0.16719781634437398433, 0.21183427203814988563},
    {0.49021817928453102351, 0.44884629688727795799},
    {1.0888821433401506896, 0.75688090575034179044},
    {2.0111947849828535312, 1.0859654673543677451},
    {3.2454527668408223434, 1.3689018259181249087},
    {4.7104445646888755722, 1.5367037302864330847},
    {6.2624573020818830204, 1.5365491952092843462},
    {7.7230000500104754144, 1.3583689468778186159},
    {8.9539442759328912873, 1.1116536179138891805},
    {9.9985318517753623924, 1.0070500397427041489},
};
constexpr Node rule14[] = {
    {0.0016043523416495239852, 0.0061122333708118545019},
    {0.023687317008939477148, 0.046234555644452849164},
    {0.11432835996213197933, 0.14663091135138660664},
    {0.3413929170434845881, 0.3197620195497297034},
    {0.77662232068804039894, 0.56059681604286264837},
    {1.4777226588390827069, 0.846340529660442529},
    {2.4718970956680286269, 1.1395715574450618076},
    {3.7440335948023433107, 1.39428128361151683},
    {5.23197033694570175, 1.5637871526705964409},
    {6.830099576622151903, 1.6093255429449953764},
    {8.4018525336836733237, 1.5096914268516437364},
    {9.8065991283501819942, 1.2853214192704893281},
    {10.974195028414996933, 1.06916241221549628},
    {11.999372766302525656, 1.0031821393705140096},
};
constexpr Node rule16[] = {
    {0.0011250421224917463977, 0.0042900687439188244619},
    {0.016695796113747497718, 0.032701968246040774407},
    {0.081275818278286993498, 0.10507693392409223571},
    {0.24564439078038698336, 0.23348715948238409046},
    {0.56765140524899867392, 0.4197204929317828507},
    {1.1013349972721048267, 0.65434644977237628423},
    {1.8859262930784741276, 0.91744034837590117209},
    {2.9363872120225260119, 1.1808923154180041921},
    {4.2369301235453391276, 1.4119936001975175391},
    {5.7385641353668892075, 1.5778106868675164581},
    {7.361169678864002882, 1.6497756299006532715},
    {9.000111897993402863, 1.608202942027677309},
    {10.538049311212844644, 1.4492301419519771217},
    {11.871547889703984482, 1.2134025852887487714},
    {12.986260180066504395, 1.0402493258642441231},
    {13.999740584705382976, 1.001379351007164982},
};

}  // namespace

AlpertLogRule::AlpertLogRule(int order) : order_(order) {
  switch (order) {
    case 4: nodes_ = rule4; break;
    case 6: nodes_ = rule6; break;
    case 8: nodes_ = rule8; break;
    case 10: nodes_ = rule10; break;
    case 12: nodes_ = rule12; break;
    case 14: nodes_ = rule14; break;
    case 16: nodes_ = rule16; break;
    default:
      throw std::invalid_argument(
          "log-singular quadrature order must be one of 4, 6, ..., 16, got " +
          std::to_string(order));
  }
}

std::size_t AlpertLogRule::offset(std::size_t i, std::size_t j, std::size_t n) {
  const std::size_t d = i > j ? i - j : j - i;
  return d <= n - d ? d : n - d;
}

double periodic_interp_weight(std::size_t i, std::size_t j, std::size_t n, double s) {
  // With t - t_j = (i - j + s) h: sin(N (t - t_j) / 2) = (-1)^(i-j) sin(pi s).
  const double h = 2.0 * std::numbers::pi / static_cast<double>(n);
  const long long d = static_cast<long long>(i) - static_cast<long long>(j);
  const double sign = (d % 2 == 0) ? 1.0 : -1.0;
  if (s == std::round(s)) {
    const long long m = static_cast<long long>(n);
    return ((d + static_cast<long long>(s)) % m + m) % m == 0 ? 1.0 : 0.0;
  }
  const double arg = 0.5 * (static_cast<double>(d) + s) * h;
  return sign * std::sin(std::numbers::pi * s) / (static_cast<double>(n) * std::tan(arg));
}

}  // namespace platewave
