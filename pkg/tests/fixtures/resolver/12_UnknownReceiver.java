package com.example;

// depends: no

public class UnknownReceiver {
    public String describe(Object helper) {
        return helper.toString();
    }
}
