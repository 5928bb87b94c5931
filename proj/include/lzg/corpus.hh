#pragma once

#include <string_view>
#include <utility>
#include <vector>

namespace lzg::corpus {

// Same text as the files under models/; a test keeps them in sync.

inline constexpr std::string_view fig1 = R"lzg(# Two independent processes, each resets its own clock once.
system fig1
process P1
process P2
clock P1 x
clock P2 y
state P1 p0 initial
state P1 p1
state P2 q0 initial
state P2 q1
trans P1 p0 p1 a reset{x}
trans P2 q0 q1 b reset{y}
)lzg";

inline constexpr std::string_view fig2 = R"lzg(# p2 is unreachable: P1 can only take c at time 4 (a1 at 2, then x==2 again),
# while P2 offers c no earlier than time 5 (b1 at 2, b2 three units later).
system fig2
process P1
process P2
clock P1 x
clock P2 y
clock P2 z
state P1 p0 initial
state P1 p1
state P1 p2
state P2 q0 initial
state P2 q1
state P2 q2
state P2 q3
trans P1 p0 p1 a1 guard{x==2} reset{x}
trans P1 p1 p2 c guard{x==2}
trans P2 q0 q1 b1 guard{z==2} reset{z}
trans P2 q1 q2 b2 guard{z==3} reset{z}
trans P2 q2 q3 c
)lzg";

inline constexpr std::string_view ab_guards = R"lzg(# a must happen before time 1 and b after time 2: ab is possible, ba is not
# under global time, while local time allows both orders.
system ab_guards
process P1
process P2
clock P1 x
clock P2 y
state P1 p0 initial
state P1 p1
state P2 q0 initial
state P2 q1
trans P1 p0 p1 a guard{x<=1}
trans P2 q0 q1 b guard{y>=2}
)lzg";

inline std::vector<std::pair<std::string_view, std::string_view>> all()
{
  return {{"fig1", fig1}, {"fig2", fig2}, {"ab_guards", ab_guards}};
}

} // namespace lzg::corpus
