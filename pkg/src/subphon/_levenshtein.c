/* Unit-cost Levenshtein alignment kernel.
 *
 * align_steps(ref, hyp) -> (cost, steps) where steps is a tuple of Step
 * instances built exactly like the pure-Python path in align.py: the
 * traceback starts at the last cell and prefers diagonal, then deletion,
 * then insertion.
 */
#define PY_SSIZE_T_CLEAN
#include <Python.h>

static PyTypeObject *step_type = NULL;
static PyObject *op_match = NULL, *op_sub = NULL, *op_del = NULL, *op_ins = NULL;

static PyObject *
configure(PyObject *self, PyObject *args)
{
    PyObject *t, *m, *s, *d, *i;
    if (!PyArg_ParseTuple(args, "O!OOOO", &PyType_Type, &t, &m, &s, &d, &i))
        return NULL;
    if (!PyType_IsSubtype((PyTypeObject *)t, &PyTuple_Type)) {
        PyErr_SetString(PyExc_TypeError, "step type must subclass tuple");
        return NULL;
    }
    Py_INCREF(t); Py_INCREF(m); Py_INCREF(s); Py_INCREF(d); Py_INCREF(i);
    Py_XSETREF(step_type, (PyTypeObject *)t);
    Py_XSETREF(op_match, m);
    Py_XSETREF(op_sub, s);
    Py_XSETREF(op_del, d);
    Py_XSETREF(op_ins, i);
    Py_RETURN_NONE;
}

static PyObject *
make_step(PyObject *op, PyObject *ref, PyObject *hyp)
{
    PyObject *st = step_type->tp_alloc(step_type, 3);
    if (st == NULL)
        return NULL;
    Py_INCREF(op);
    Py_INCREF(ref);
    Py_INCREF(hyp);
    PyTuple_SET_ITEM(st, 0, op);
    PyTuple_SET_ITEM(st, 1, ref);
    PyTuple_SET_ITEM(st, 2, hyp);
    return st;
}

static PyObject *
align_steps(PyObject *self, PyObject *args)
{
    PyObject *ref_obj, *hyp_obj;
    PyObject *ref = NULL, *hyp = NULL, *steps = NULL, *result = NULL;
    Py_ssize_t *table = NULL;
    char *eq = NULL;
    Py_ssize_t n, m, i, j, w;

    if (step_type == NULL) {
        PyErr_SetString(PyExc_RuntimeError, "kernel not configured");
        return NULL;
    }
    if (!PyArg_ParseTuple(args, "OO", &ref_obj, &hyp_obj))
        return NULL;
    ref = PySequence_Fast(ref_obj, "reference must be a sequence");
    if (ref == NULL)
        goto done;
    hyp = PySequence_Fast(hyp_obj, "hypothesis must be a sequence");
    if (hyp == NULL)
        goto done;
    n = PySequence_Fast_GET_SIZE(ref);
    m = PySequence_Fast_GET_SIZE(hyp);
    w = m + 1;

    table = PyMem_New(Py_ssize_t, (n + 1) * w);
    eq = PyMem_Malloc(n * m + 1);
    if (table == NULL || eq == NULL) {
        PyErr_NoMemory();
        goto done;
    }

    PyObject **r_items = PySequence_Fast_ITEMS(ref);
    PyObject **h_items = PySequence_Fast_ITEMS(hyp);
    for (i = 0; i < n; i++) {
        for (j = 0; j < m; j++) {
            int same = r_items[i] == h_items[j];
            if (!same) {
                same = PyObject_RichCompareBool(r_items[i], h_items[j], Py_EQ);
                if (same < 0)
                    goto done;
            }
            eq[i * m + j] = (char)same;
        }
    }

    for (j = 0; j <= m; j++)
        table[j] = j;
    for (i = 1; i <= n; i++) {
        Py_ssize_t *prev = table + (i - 1) * w, *cur = table + i * w;
        cur[0] = i;
        for (j = 1; j <= m; j++) {
            Py_ssize_t best = prev[j - 1] + !eq[(i - 1) * m + j - 1];
            if (prev[j] + 1 < best)
                best = prev[j] + 1;
            if (cur[j - 1] + 1 < best)
                best = cur[j - 1] + 1;
            cur[j] = best;
        }
    }

    /* Count steps first so the tuple can be filled back to front. */
    Py_ssize_t len = 0;
    i = n;
    j = m;
    while (i && j) {
        Py_ssize_t here = table[i * w + j];
        Py_ssize_t diag = table[(i - 1) * w + j - 1];
        if (diag + !eq[(i - 1) * m + j - 1] == here) { i--; j--; }
        else if (table[(i - 1) * w + j] + 1 == here) { i--; }
        else { j--; }
        len++;
    }
    len += i + j;

    steps = PyTuple_New(len);
    if (steps == NULL)
        goto done;
    Py_ssize_t k = len;
    i = n;
    j = m;
    while (i && j) {
        Py_ssize_t here = table[i * w + j];
        Py_ssize_t diag = table[(i - 1) * w + j - 1];
        int same = eq[(i - 1) * m + j - 1];
        PyObject *st;
        if (diag + !same == here) {
            st = make_step(same ? op_match : op_sub, r_items[i - 1], h_items[j - 1]);
            i--; j--;
        }
        else if (table[(i - 1) * w + j] + 1 == here) {
            st = make_step(op_del, r_items[i - 1], Py_None);
            i--;
        }
        else {
            st = make_step(op_ins, Py_None, h_items[j - 1]);
            j--;
        }
        if (st == NULL)
            goto done;
        PyTuple_SET_ITEM(steps, --k, st);
    }
    while (i) {
        PyObject *st = make_step(op_del, r_items[--i], Py_None);
        if (st == NULL)
            goto done;
        PyTuple_SET_ITEM(steps, --k, st);
    }
    while (j) {
        PyObject *st = make_step(op_ins, Py_None, h_items[--j]);
        if (st == NULL)
            goto done;
        PyTuple_SET_ITEM(steps, --k, st);
    }

    result = Py_BuildValue("(nO)", table[n * w + m], steps);

done:
    PyMem_Free(table);
    PyMem_Free(eq);
    Py_XDECREF(ref);
    Py_XDECREF(hyp);
    Py_XDECREF(steps);
    return result;
}

static PyMethodDef methods[] = {
    {"configure", configure, METH_VARARGS, "Register the Step type and Op members."},
    {"align_steps", align_steps, METH_VARARGS, "Return (cost, steps) for two phone sequences."},
    {NULL, NULL, 0, NULL},
};

static struct PyModuleDef module = {
    PyModuleDef_HEAD_INIT, "_levenshtein", NULL, -1, methods,
};

PyMODINIT_FUNC
PyInit__levenshtein(void)
{
    return PyModule_Create(&module);
}
