#!python3

## Import General Tools
import numpy as np


class FlowError(Exception): pass


##-------------------------------------------------------------------------
## EdgeFlows
##-------------------------------------------------------------------------
class EdgeFlows():
    '''Per-edge flows on a graph.

    One value is stored per undirected edge (u, v) with u < v: the amount
    moving from u to v.  The reverse direction is the negation, so
    antisymmetry holds by construction.
    '''
    def __init__(self, graph, values):
        values = np.asarray(values)
        if values.shape != (graph.m,):
            raise FlowError(f'Expected {graph.m} edge values, got {values.shape}')
        self.graph = graph
        self.values = values


    def directed(self):
        '''Values on every arc of the graph's CSR adjacency.'''
        return self.values[self.graph.arc_edge] * self.graph.arc_sign


    def get(self, i, j):
        e = self.graph.edge_index(i, j)
        return self.values[e] if i < j else -self.values[e]


    def to_dense(self):
        g = self.graph
        out = np.zeros((g.n, g.n), dtype=self.values.dtype)
        out[g.eu, g.ev] = self.values
        out[g.ev, g.eu] = -self.values
        return out


    def __len__(self):
        return len(self.values)


    def __repr__(self):
        return f'{self.__class__.__name__} ({self.graph.m} edges)'


class ScheduledFlows(EdgeFlows):
    '''The fractional flows a continuous scheme would send.'''
    pass


class RoundingErrors(EdgeFlows):
    '''Scheduled minus realized flow on every edge.'''
    pass


##-------------------------------------------------------------------------
## Schedules
##-------------------------------------------------------------------------
def fos_flows(x, graph):
    '''y(u,v) = alpha(u,v) * (x_u/s_u - x_v/s_v).'''
    x = np.asarray(x, dtype=float)
    return ScheduledFlows(graph, graph.alpha * graph.scaled_difference(x))


def sos_flows(x, y_prev, beta, graph):
    '''y(u,v) = (beta-1) y_prev(u,v) + beta alpha(u,v) (x_u/s_u - x_v/s_v).'''
    if isinstance(y_prev, EdgeFlows):
        y_prev = y_prev.values
    x = np.asarray(x, dtype=float)
    y_prev = np.asarray(y_prev, dtype=float)
    values = (beta - 1)*y_prev + beta*graph.alpha*graph.scaled_difference(x)
    return ScheduledFlows(graph, values)


def apply_flows(x, flows):
    '''Send every flow and return (x_next, transient).

    The transient state is the load after every node has sent its outgoing
    flows but before anything arrives.  Integer loads with integer flows stay
    integers.
    '''
    graph = flows.graph
    x = np.asarray(x)
    y = flows.values
    out = graph.net_outflow(y)
    sent = graph.gross_outflow(y)
    if np.issubdtype(x.dtype, np.integer) and np.issubdtype(y.dtype, np.integer):
        out = np.rint(out).astype(x.dtype)
        sent = np.rint(sent).astype(x.dtype)
    return x - out, x - sent
