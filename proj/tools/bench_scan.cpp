// Compares the serial scan against the OpenMP-parallel one on the same range
// and checks that the rows agree.

#include <chrono>
#include <cstdlib>
#include <iostream>

#include "pcf/theory.hpp"

using namespace pcf;

namespace {
double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

bool rows_equal(const ScanResult& a, const ScanResult& b) {
    if (a.rows.size() != b.rows.size()) return false;
    for (size_t i = 0; i < a.rows.size(); ++i) {
        const auto &x = a.rows[i], &y = b.rows[i];
        if (x.D != y.D || x.status != y.status || x.h != y.h || x.k != y.k ||
            x.sign_branch_count != y.sign_branch_count)
            return false;
    }
    return true;
}
}  // namespace

int main(int argc, char** argv) {
    long d_max = argc > 1 ? std::atol(argv[1]) : 1200;
    long max_steps = argc > 2 ? std::atol(argv[2]) : 400;
    Prime p = Prime::checked(argc > 3 ? std::atol(argv[3]) : 5);

    auto t0 = std::chrono::steady_clock::now();
    ScanResult serial = conjecture_scan(p, 2, d_max, Algorithm::browkin_ii, max_steps, 1);
    double ts = seconds_since(t0);

    t0 = std::chrono::steady_clock::now();
    ScanResult parallel = conjecture_scan(p, 2, d_max, Algorithm::browkin_ii, max_steps, 0);
    double tp = seconds_since(t0);

    std::cout << "scan p=" << p.value << " D=2.." << d_max << " max_steps=" << max_steps
              << " rows=" << serial.rows.size() << "\n";
    std::cout << "serial:   " << ts << " s\n";
    std::cout << "parallel: " << tp << " s  (speedup " << (tp > 0 ? ts / tp : 0) << "x)\n";
    if (!rows_equal(serial, parallel)) {
        std::cout << "MISMATCH between serial and parallel rows\n";
        return 1;
    }
    std::cout << "rows identical\n";
    return 0;
}
