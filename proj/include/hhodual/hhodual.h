#ifndef HHODUAL_H
#define HHODUAL_H

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(_WIN32)
#define HHO_API __declspec(dllexport)
#else
#define HHO_API __attribute__((visibility("default")))
#endif

/* Status codes returned by every call. */
enum hho_status {
    HHO_OK = 0,
    HHO_ERROR = 1,            /* I/O or internal failure */
    HHO_USAGE_ERROR = 2,      /* bad key, value or combination */
    HHO_NOT_CONVERGED = 3,    /* Newton solver did not converge */
    HHO_INVARIANT_ERROR = 4   /* estimator or duality invariant violated */
};

typedef struct hho_mesh hho_mesh;
typedef struct hho_config hho_config;
typedef struct hho_run hho_run;

typedef struct hho_record {
    int level;
    int ndof;
    int cells;
    double hmax;
    double energy_h;
    double energy_v0;
    double dual_energy;
    double leb;
    double gap;
    double osc;
    int newton_iterations;
    double wall_seconds;
    int has_errors;
    double err_grad;
    double err_flux;
    double err_quasi;
    double energy_u;
    double osc_p2;
    double eta_sum;
    double el_residual;
    double el_scale;
    double div_residual;
    double discrete_dual_energy;
} hho_record;

/* Message of the last failed call on this thread; never NULL. */
HHO_API const char* hho_last_error_message(void);

HHO_API int hho_mesh_lshape(hho_mesh** out);
HHO_API int hho_mesh_read(const char* path, hho_mesh** out);
HHO_API int hho_mesh_write(const hho_mesh* mesh, const char* path);
HHO_API int hho_mesh_refine_uniform(const hho_mesh* mesh, hho_mesh** out);
HHO_API int hho_mesh_num_cells(const hho_mesh* mesh, int* out);
HHO_API int hho_mesh_num_vertices(const hho_mesh* mesh, int* out);
HHO_API void hho_mesh_destroy(hho_mesh* mesh);

HHO_API int hho_config_create(hho_config** out);
/* Keys: problem, k, r, s, eps, p, theta, refine, levels, max_ndof, out, mesh, f_const. */
HHO_API int hho_config_set(hho_config* config, const char* key, const char* value);
HHO_API int hho_config_validate(const hho_config* config);
HHO_API void hho_config_destroy(hho_config* config);

/* Runs the benchmark; *out is created even when the status is 3 or 4. */
HHO_API int hho_run_execute(const hho_config* config, hho_run** out);
HHO_API int hho_run_status(const hho_run* run, int* status, const char** message);
HHO_API int hho_run_num_records(const hho_run* run, int* out);
HHO_API int hho_run_record(const hho_run* run, int index, hho_record* out);
HHO_API int hho_run_write_csv(const hho_run* run, const char* path);
/* CSV, final mesh and per-level indicators into the configured output directory. */
HHO_API int hho_run_write_artifacts(const hho_run* run);
HHO_API int hho_run_final_mesh(const hho_run* run, hho_mesh** out);
HHO_API void hho_run_destroy(hho_run* run);

#ifdef __cplusplus
}
#endif

#endif
