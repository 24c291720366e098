#include "fomas/example.hpp"

namespace fomas {

const std::string& bundled_example_json() {
    static const std::string text = R"json({
  "alpha": 0.8,
  "n_c": 0,
  "A": [[-1, 1, 0, 0], [1, -3, 0, 1], [0, 0, 0, 1], [0, 0, -1, 0]],
  "C": [[1, 0, 1, 0]],
  "agents": [
    {"B": [[1], [1], [0], [1]]},
    {"B": [[1], [1], [0], [1]]},
    {"B": [[1], [1], [0], [1]]},
    {"B": [[1], [1], [0], [1]]}
  ],
  "adjacency": [[0, 1, 0, 1], [1, 0, 1, 0], [0, 1, 0, 1], [1, 0, 1, 0]],
  "uncertainty": {
    "M": [[0.2], [0], [-0.1], [0.3]],
    "R": [[0, 0.2, 0.4, -0.2]],
    "J": [[1]],
    "deltas": [0.5, -0.4, 0.1, 0.8]
  },
  "sim": {
    "h": 0.001,
    "t_end": 30,
    "x0": [2.5, -3, -2.5, 1.5, 0.1, 0.5, 2, 1, 0.1, 0.8, 0.54, 1.1, -3, -2.5, -2.3, 3]
  },
  "homotopy": {"T": 10, "eps_feas": 1e-7, "q_shift": 1.0, "max_refinements": 6},
  "reference_controllers": {
    "theorem1_order0": {
      "n_c": 0,
      "blocks": [
        {"D_c": [[-2.2501]]},
        {"D_c": [[-3.0239]]},
        {"D_c": [[-2.2501]]},
        {"D_c": [[-1.3580]]}
      ]
    },
    "corollary1_order0": {
      "n_c": 0,
      "blocks": [
        {"D_c": [[-2.7534]]},
        {"D_c": [[-3.1985]]},
        {"D_c": [[-2.7534]]},
        {"D_c": [[-1.8184]]}
      ]
    },
    "theorem1_order2": {
      "n_c": 2,
      "blocks": [
        {"A_c": [[-53.7197, -15.1371], [22.4322, -24.3364]], "B_c": [[43.6203], [-1.8477]], "C_c": [[-2.1540, -4.7027]], "D_c": [[-10.0066]]},
        {"A_c": [[-35.3656, 39.5514], [13.0965, -25.5037]], "B_c": [[-10.2150], [-4.7566]], "C_c": [[6.5429, -7.9858]], "D_c": [[-10.0034]]},
        {"A_c": [[-43.6527, 8.7360], [11.9074, -25.4178]], "B_c": [[16.6661], [4.5128]], "C_c": [[-6.0084, -4.1185]], "D_c": [[-9.9941]]},
        {"A_c": [[-36.5995, 10.9339], [12.8142, -29.2978]], "B_c": [[7.3644], [5.2846]], "C_c": [[3.3085, 3.0719]], "D_c": [[-8.8604]]}
      ]
    },
    "corollary1_order2": {
      "n_c": 2,
      "blocks": [
        {"A_c": [[-36.1669, 6.7979], [6.7979, -36.1669]], "B_c": [[0.8343], [0.8343]], "C_c": [[0.2524, 0.2524]], "D_c": [[-3.4923]]},
        {"A_c": [[-37.0864, 5.8784], [5.8784, -37.0864]], "B_c": [[1.2489], [1.2489]], "C_c": [[0.3631, 0.3631]], "D_c": [[-4.9571]]},
        {"A_c": [[-36.1669, 6.7979], [6.7979, -36.1669]], "B_c": [[0.8343], [0.8343]], "C_c": [[0.2524, 0.2524]], "D_c": [[-3.4923]]},
        {"A_c": [[-36.9240, 6.0408], [6.0408, -36.9240]], "B_c": [[-0.8981], [-0.8981]], "C_c": [[-1.3966, -1.3966]], "D_c": [[-2.3834]]}
      ]
    }
  }
}
)json";
    return text;
}

ProblemFile bundled_example() {
    return parse_problem_json(bundled_example_json());
}

}  // namespace fomas
