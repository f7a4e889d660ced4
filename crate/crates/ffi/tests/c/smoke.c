#include <math.h>
#include <stdio.h>
#include "fresnel_tomo.h"

static int gcf(double x, double mu, double nu, void *user, double *out) {
    const double *p = (const double *)user;
    return ft_gcf_tomogram(p[0], p[1], x, mu, nu, out) == FT_STATUS_OK ? 0 : 1;
}

int main(void) {
    double params[2] = {1.0, 0.5};
    FtInversionConfig cfg;
    if (ft_config_default(&cfg) != FT_STATUS_OK) return 1;
    cfg.mu_window = 16.0;
    cfg.x_window = 32.0;
    cfg.mu_step = 0.5;
    cfg.x_step = 0.1;

    FtDensityMatrix *rho = NULL;
    if (ft_reconstruct_density_matrix(gcf, params, -1.0, 0.5, 5, &cfg, &rho) != FT_STATUS_OK) {
        fprintf(stderr, "%s\n", ft_last_error_message());
        return 2;
    }
    double re, im;
    ft_density_matrix_get(rho, 2, 2, &re, &im);
    ft_density_matrix_free(rho);
    /* |psi(0)|^2 = sqrt(2/pi) for sigma = 1 */
    if (fabs(re - sqrt(2.0 / M_PI)) > 5e-3) return 3;

    FtWavefunction *psi = NULL;
    if (ft_wavefunction_gcf(-1.0, 0.0, -1.0, 0.1, 21, &psi) != FT_STATUS_INVALID_ARGUMENT) return 4;
    printf("ok %s\n", ft_version());
    return 0;
}
