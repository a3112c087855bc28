package com.example;

import org.json.JSONObject;

// depends: yes

public class AnnotationTrap {
    @SuppressWarnings("unchecked")
    @CustomTag(target = JSONObject.class, note = "new JSONObject(1)")
    public void tagged() {
    }

    @interface CustomTag {
        Class<?> target();

        String note();
    }
}
