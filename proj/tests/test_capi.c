#include <math.h>
#include <stdio.h>
#include <stdlib.h>
#include <string.h>

#include "hhodual/hhodual.h"

static int failures = 0;

#define EXPECT(cond)                                                        \
    do {                                                                    \
        if (!(cond)) {                                                      \
            fprintf(stderr, "%s:%d: expected %s\n", __FILE__, __LINE__, #cond); \
            ++failures;                                                     \
        }                                                                   \
    } while (0)

static void mesh_calls(const char* dir)
{
    hho_mesh* m = NULL;
    hho_mesh* fine = NULL;
    hho_mesh* back = NULL;
    int n = 0;
    char path[1024];

    EXPECT(hho_mesh_lshape(&m) == HHO_OK);
    EXPECT(hho_mesh_num_cells(m, &n) == HHO_OK && n == 6);
    EXPECT(hho_mesh_num_vertices(m, &n) == HHO_OK && n == 8);
    EXPECT(hho_mesh_refine_uniform(m, &fine) == HHO_OK);
    EXPECT(hho_mesh_num_cells(fine, &n) == HHO_OK && n == 24);

    snprintf(path, sizeof path, "%s/capi_mesh.txt", dir);
    EXPECT(hho_mesh_write(fine, path) == HHO_OK);
    EXPECT(hho_mesh_read(path, &back) == HHO_OK);
    EXPECT(hho_mesh_num_cells(back, &n) == HHO_OK && n == 24);
    remove(path);

    EXPECT(hho_mesh_read("/nonexistent/mesh.txt", &back) == HHO_ERROR);
    EXPECT(strlen(hho_last_error_message()) > 0);
    EXPECT(hho_mesh_num_cells(NULL, &n) != HHO_OK);

    hho_mesh_destroy(m);
    hho_mesh_destroy(fine);
    hho_mesh_destroy(back);
    hho_mesh_destroy(NULL);
}

static void config_calls(void)
{
    hho_config* c = NULL;
    EXPECT(hho_config_create(&c) == HHO_OK);
    EXPECT(hho_config_set(c, "problem", "odp") == HHO_OK);
    EXPECT(hho_config_validate(c) == HHO_OK);
    EXPECT(hho_config_set(c, "colour", "red") == HHO_USAGE_ERROR);
    EXPECT(hho_config_set(c, "k", "two") == HHO_USAGE_ERROR);
    EXPECT(hho_config_set(c, "refine", "sideways") == HHO_USAGE_ERROR);
    EXPECT(hho_config_set(c, "eps", "1e-3") == HHO_OK);
    EXPECT(hho_config_validate(c) == HHO_USAGE_ERROR);
    EXPECT(strstr(hho_last_error_message(), "eps") != NULL);
    hho_config_destroy(c);

    EXPECT(hho_config_create(&c) == HHO_OK);
    EXPECT(hho_config_set(c, "problem", "bingham") == HHO_OK);
    EXPECT(hho_config_set(c, "k", "5") == HHO_OK);
    EXPECT(hho_config_validate(c) == HHO_USAGE_ERROR);
    hho_config_destroy(c);
}

static void run_calls(const char* dir)
{
    hho_config* c = NULL;
    hho_run* r = NULL;
    hho_record rec;
    hho_mesh* m = NULL;
    int n = 0, status = -1, i;
    const char* message = NULL;
    char path[1024];

    EXPECT(hho_config_create(&c) == HHO_OK);
    EXPECT(hho_config_set(c, "problem", "plaplace") == HHO_OK);
    EXPECT(hho_config_set(c, "k", "1") == HHO_OK);
    EXPECT(hho_config_set(c, "refine", "uniform") == HHO_OK);
    EXPECT(hho_config_set(c, "levels", "2") == HHO_OK);
    EXPECT(hho_config_set(c, "out", dir) == HHO_OK);
    EXPECT(hho_run_execute(c, &r) == HHO_OK);
    EXPECT(hho_run_status(r, &status, &message) == HHO_OK && status == HHO_OK);
    EXPECT(hho_run_num_records(r, &n) == HHO_OK && n == 2);
    for (i = 0; i < n; ++i) {
        EXPECT(hho_run_record(r, i, &rec) == HHO_OK);
        EXPECT(rec.level == i);
        EXPECT(rec.has_errors == 1);
        EXPECT(rec.gap >= 0.0);
        EXPECT(rec.leb <= rec.energy_v0);
        EXPECT(fabs(rec.gap - rec.eta_sum) <= 1e-10 * (1.0 + fabs(rec.energy_v0)));
    }
    EXPECT(hho_run_record(r, n, &rec) == HHO_USAGE_ERROR);
    EXPECT(hho_run_final_mesh(r, &m) == HHO_OK);
    EXPECT(hho_mesh_num_cells(m, &n) == HHO_OK && n == 24);

    snprintf(path, sizeof path, "%s/capi.csv", dir);
    EXPECT(hho_run_write_csv(r, path) == HHO_OK);
    remove(path);
    EXPECT(hho_run_write_artifacts(r) == HHO_OK);
    snprintf(path, sizeof path, "%s/plaplace_uniform_k1.csv", dir);
    {
        FILE* f = fopen(path, "r");
        EXPECT(f != NULL);
        if (f) fclose(f);
    }

    hho_mesh_destroy(m);
    hho_run_destroy(r);
    hho_config_destroy(c);
}

int main(int argc, char** argv)
{
    const char* dir = argc > 1 ? argv[1] : ".";
    mesh_calls(dir);
    config_calls();
    run_calls(dir);
    if (failures) fprintf(stderr, "%d failure(s)\n", failures);
    else printf("all C API checks passed\n");
    return failures ? 1 : 0;
}
