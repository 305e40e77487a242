// fridge_window.cpp — Cooling power and COP of the three-qubit fridge across the cooling window

#include <cstdio>

#include "qam/qam.hpp"

int main() {
    const double t_c = 1.0, t_h = 1.1, t_w = 1.5, omega_w = 1.0, g = 0.02;
    const double edge = qam::cooling_window(t_c, t_h, t_w) * omega_w;
    std::printf("cooling window edge omega_c = %.4f\n", edge);
    std::printf("%8s %14s %10s %10s\n", "omega_c", "J_c", "COP", "sigma");
    for (double omega_c = 0.25; omega_c < 3.0; omega_c += 0.25) {
        const auto machine = qam::build_three_qubit(omega_c, omega_c + omega_w, g);
        const std::vector<qam::BathSpec> baths{{'c', t_c, 1e-3, 1, omega_w},
                                               {'h', t_h, 1e-3, 1, omega_w},
                                               {'w', t_w, 1e-3, 1, omega_w}};
        const auto ss = qam::steady_state(qam::machine_liouvillian(machine, baths, qam::DissipationModel::local));
        std::printf("%8.2f %14.6e %10.4f %10.3e\n", omega_c, ss.current('c'), ss.current('c') / ss.current('w'),
                    ss.entropy_rate);
    }
}
